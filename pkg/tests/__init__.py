# solidhull Tests
