# QSPLayer core: nonlinear Fourier analysis for QSP phase factors
