# solidhull src package
