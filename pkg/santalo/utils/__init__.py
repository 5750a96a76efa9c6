# santalo.utils package
