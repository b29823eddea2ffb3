"""Heavy-tailed densities, maximum-likelihood fits and divergence-based model selection."""
from .densities import (AlphaStableParams, QGaussianParams, StableDensity, alpha_stable_pdf,
                        q_exponential, q_gaussian_logpdf, q_gaussian_norm, q_gaussian_pdf,
                        stable_density)
from .fitting import (FAMILIES, DistributionFit, empirical_histogram, fit_mle, kl_divergence,
                      select_model)

__all__ = [
    "AlphaStableParams", "QGaussianParams", "StableDensity", "alpha_stable_pdf",
    "q_exponential", "q_gaussian_logpdf", "q_gaussian_norm", "q_gaussian_pdf",
    "stable_density", "FAMILIES", "DistributionFit", "empirical_histogram", "fit_mle",
    "kl_divergence", "select_model",
]
