# santalo.bodies package
