"""
Right-hand sides of the vector-field and Sobolev-bracket estimates.

All bounds take the lattice constant c = sqrt(sum <j>^{-2}) over the finite
lattice, so they are slightly tighter than their infinite-lattice versions.
"""
from polynomial.lattice import lattice_constant  # noqa: F401  re-exported for callers


def vector_field_bound(C: float, r: int, p: float, c: float, norm_2: float, norm_p: float) -> float:
    """||X_f||_{p-1} <= 16 C^{r-2} r^{p+1} c^{r-1} ||u||_2^{r-2} ||u||_p"""
    return 16.0 * C ** (r - 2) * r ** (p + 1) * c ** (r - 1) * norm_2 ** (r - 2) * norm_p


def sobolev_bracket_bound(C: float, r: int, p: float, c: float, norm_2: float, norm_p: float) -> float:
    """|{f, ||u||_p^2}| <= C^{r-2} 2^{p+1} p r^{p-1} c^{r-1} ||u||_p^2 ||u||_2^{r-2}"""
    return C ** (r - 2) * 2.0 ** (p + 1) * p * r ** (p - 1) * c ** (r - 1) * norm_p ** 2 * norm_2 ** (r - 2)


def truncated_vector_field_bounds(C: float, r: int, p: float, c: float, beta: float, N: int,
                                  norm_2: float, norm_p: float, tail_2: float) -> dict:
    """
    Vector-field bounds for the two truncation parts of a homogeneous f

    Args:
        tail_2: ||Gamma_{>N} u||_2

    Returns:
        {"le2": bound for Gamma_{<=2}^N f, "gt2": bound for Gamma_{>2}^N f}
    """
    base = 16.0 * C ** (r - 2) * r ** (p + 1) * c ** (r - 1)
    le2 = base * norm_2 ** (r - 2) * norm_p
    gt2 = base * norm_2 ** (r - 3) * tail_2 * norm_p + N ** (-(beta - p - 0.5)) * base * norm_2 ** (r - 2) * norm_p
    return {"le2": le2, "gt2": gt2}


def truncated_sobolev_bracket_bounds(C: float, r: int, p: float, c: float, beta: float, N: int,
                                     norm_2: float, norm_p: float, tail_2: float) -> dict:
    """Sobolev-bracket counterpart of truncated_vector_field_bounds"""
    base = C ** (r - 2) * p * r ** (p - 1) * c ** (r - 1)
    le2 = base * 2.0 ** (p + 1) * norm_p ** 2 * norm_2 ** (r - 2)
    gt2 = (base * 2.0 ** (p + 1) * norm_p ** 2 * norm_2 ** (r - 3) * tail_2
           + N ** (-(beta - p - 0.5)) * base * 2.0 ** (p + 2) * norm_p ** 2 * norm_2 ** (r - 2))
    return {"le2": le2, "gt2": gt2}


def normal_form_drift_bound(C: float, r: int, p: float, c: float, N: int,
                            norm_2: float, norm_p: float, tail_2: float) -> float:
    """|{Z_r, ||u||_p^2}| <= 20 r^{p+1} c^{r-1} C^{r-2} N ||Gamma_{>N} u||_2 ||u||_2^{r-3} ||u||_p"""
    return 20.0 * r ** (p + 1) * c ** (r - 1) * C ** (r - 2) * N * tail_2 * norm_2 ** (r - 3) * norm_p
