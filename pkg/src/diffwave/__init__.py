"""Diffusion waves of the damped p-system on the half-line.

Modules
-------
model        pressure laws, damping schedule, beta(t) and B(t)
correction   correction pairs carrying the far-field momentum
waves        Gaussian, parabolic, self-similar and constant diffusion waves
solver       finite-volume integrator with exact damping
asymptotics  perturbation fields, weighted functionals, decay fits
cli          batch front end
"""
from .model import (DampingSchedule, DomainError, FarFieldState, GammaLaw, PressureLaw, B_tail,
                    B_tail_closed_form, beta_kernel, beta_kernel_deriv, damping_coefficient, pressure,
                    pressure_deriv, sandwich_threshold, sound_speed)
from .correction import CorrectionPair, Mollifier, correction_eval, mollifier_eval
from .grid import Grid1D
from .waves import (ConstantWave, ExtrapolationError, GaussianWave, ParabolicWave, SelfSimilarWave, WaveError,
                    build_dirichlet_wave_initdata, constant_wave, dirichlet_diffusion_wave, gaussian_linear_wave,
                    load_profile, neumann_selfsimilar_profile, save_profile, selfsimilar_residual, wave_eval)
from .solver import (PositivityError, SolverConfig, SolverError, State, Trajectory, apply_boundary,
                     exact_damping_integral, hyperbolic_flux, run, step)
from .asymptotics import (DecayReport, boundedness_check, fit_decay, norm, perturbation_fields, predicted_rate,
                          bound_weights, weighted_energy_series, weighted_functionals)

__version__ = "0.1.0"
