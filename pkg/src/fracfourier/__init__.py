"""Numerical laboratory for Fourier decay of self-similar measures,
their slowly-decaying parameter families, and smooth pushforwards."""

__version__ = "0.1.0"

from .errors import BudgetExceededError, ValidationError, VerificationFailed
from .measures import (SelfSimilarIFS, SimilarityMap, Stopping, build_stopping,
                       cantor_lebesgue, compose_word, measure_interval,
                       missing_digit, mu_t_ifs, word_prob)
from .fourier import (ExactFrequency, FourierValue, ft_digit_system,
                      ft_general, ft_mu_t, parse_frequency)
from .logdomain import LogReal
from .slowdecay import DecayFunction, MonotoneEnvelope, monotone_envelope
from .smoothmaps import (Schedule, ScheduleReport, SmoothMapSpec,
                         build_schedule, conjugate_derivatives, eval_map,
                         eval_map_enclosure, recurrence_zero_word,
                         verify_schedule, zero_scan)
from .pushforward import (DecayProfile, KnResult, NearZeroReport,
                          OscIntegralResult, RegionReport, decay_profile,
                          near_zero_check, pushforward_ft, region_report,
                          select_kn, stopping_quadrature)

__all__ = [
    "BudgetExceededError", "ValidationError", "VerificationFailed",
    "SelfSimilarIFS", "SimilarityMap", "Stopping", "build_stopping",
    "cantor_lebesgue", "compose_word", "measure_interval", "missing_digit",
    "mu_t_ifs", "word_prob",
    "ExactFrequency", "FourierValue", "ft_digit_system", "ft_general",
    "ft_mu_t", "parse_frequency",
    "LogReal",
    "DecayFunction", "MonotoneEnvelope", "monotone_envelope",
    "Schedule", "ScheduleReport", "SmoothMapSpec", "build_schedule",
    "conjugate_derivatives", "eval_map", "eval_map_enclosure",
    "recurrence_zero_word", "verify_schedule", "zero_scan",
    "DecayProfile", "KnResult", "NearZeroReport", "OscIntegralResult",
    "RegionReport", "decay_profile", "near_zero_check", "pushforward_ft",
    "region_report", "select_kn", "stopping_quadrature",
]
