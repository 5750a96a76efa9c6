# santalo.symfun package
