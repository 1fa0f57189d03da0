# QSPLayer command-line interface
