# santalo.harness package
