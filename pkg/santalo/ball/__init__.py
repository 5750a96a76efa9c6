# santalo.ball package
