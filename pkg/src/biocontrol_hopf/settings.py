from dataclasses import dataclass


@dataclass(frozen=True)
class ToleranceSettings:
    """Numerical tolerances shared by all modules.

    Attributes
    ----------
    equilibrium_residual : float
        Relative bound on ``|f(x)|`` accepted for a closed-form equilibrium.
    axis_band : float
        Eigenvalues with ``|Re λ| <= axis_band * ||J||_inf`` count as lying
        on the imaginary axis.
    sigma_band : float
        A parameter point is "on Σ" when ``|Δ| <= sigma_band * a1*a2*a3``.
    eig_rtol : float
        Relative accuracy target for eigenvalue polishing.
    singular_rtol : float
        Shifted solves are refused when the smallest singular value of the
        shifted matrix is below ``singular_rtol`` times its norm.
    hopf_l1_tol : float
        ``|l1|`` below this is reported as degenerate by ``classify_hopf``.
    """

    equilibrium_residual: float = 1e-9
    axis_band: float = 1e-8
    sigma_band: float = 1e-6
    eig_rtol: float = 1e-10
    singular_rtol: float = 1e-13
    hopf_l1_tol: float = 1e-14


DEFAULT_TOLERANCES = ToleranceSettings()
