"""Error exponents of discrete and Gaussian two-user MACs, split linear
codes, the dithered modulo transformation and nested PAM simulation."""
from .channels import (AdditiveNoiseChannel, Dmc, Mac2, Pmf, associated_single_user,
                       binary_example_channel, channel_from_json, channel_to_json,
                       mac_from_additive_noise)
from .curves import ExponentCurve, sample_curve
from .errors import (IndependenceViolation, InvalidDims, InvalidPmf, MacexpError,
                     NonPrimeModulus, NotAdditive, TooLarge, ZeroCapacity)
from .gaussian_exponents import (GaussianMacParams, distributed_nesting_exponent,
                                 gallager_spherical_ub, poltyrev_exponent,
                                 su_gaussian_best, su_gaussian_expurgated,
                                 su_gaussian_random_coding)
from .linear_codes import (GeneratorMatrix, SplitCode, exact_ml_error_probability,
                           exact_split_mac_error_probability, minkowski_sum,
                           random_full_rank_generator, split)
from .sim import PamTriplet, SimConfig, pam_codebooks, simulate_pam_mac, simulate_split_mac
from .su_exponents import (best_known_exponent, capacity, critical_rate, expurgated_exponent,
                           expurgation_rate, random_coding_exponent, slepian_wolf_mac_exponent)
from .transform import (TransformSpec, VirtualChannel, apply_transform, binary_gamma,
                        search_transform, virtual_exponent)

__version__ = "0.1.0"
