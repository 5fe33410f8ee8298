# Library modules for booktor
