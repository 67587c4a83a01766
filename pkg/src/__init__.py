# Research Weekly Feed Package
