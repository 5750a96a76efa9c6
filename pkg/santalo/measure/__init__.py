# santalo.measure package
