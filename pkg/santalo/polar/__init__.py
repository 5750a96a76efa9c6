# santalo.polar package
