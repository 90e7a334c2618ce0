"""Exact and asymptotic Littlewood-Offord concentration for Curie-Weiss spin models."""

from cwlo.model import ModelParams, Regime, beta_critical, classify_regime, solve_mean_field

__all__ = ["ModelParams", "Regime", "beta_critical", "classify_regime", "solve_mean_field"]
