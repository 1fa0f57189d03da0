# QSPLayer Tests Module
