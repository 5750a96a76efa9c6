# santalo.functional package
