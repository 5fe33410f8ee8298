# booktor package
