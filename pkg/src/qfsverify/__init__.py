"""Noisy quantum Fourier sampling workbench.

Simulates the noisy Fourier-sampling circuit classically, rectifies its
errors, learns parities agnostically, and runs the one-round
verifier-prover protocol with Monte Carlo validation at desk scale.
"""
from .bits import CapacityError, format_bits, parse_bits
from .boolfn import (BooleanFunction, FourierSpectrum, GenerationError,
                     coeff_bruteforce, gen_ftau, read_function, read_spectrum,
                     write_function, write_spectrum)
from .harness import ExperimentConfig, TrialRecord, derive_seed, run_experiment, wilson_interval
from .noise import (BitFlipNoise, BlockFlipNoise, DepolarizingNoise,
                    analytic_noisy_dist, eta_eff, make_channel, p0_eff)
from .oracles import (ExampleBatch, P0Sampler, RandomExample, draw_examples,
                      p0_sample, qfs_raw, qfs_sample_noisy, random_example,
                      sample_batch)
from .protocol import (Accepted, Rejected, SampleBatch, SampleRequest, Transcript,
                       VerifierParams, adversary, honest_prover, protocol_trial,
                       read_transcript, replay_transcript, verifier_run,
                       write_transcript)
from .rectify import heavy_set, list_cap, nearest_match, p_d_poly, rectify, required_samples
from .spectral import (SparseEstimate, estimate_coeffs, examples_needed,
                       learn_parity, regret, sparse_estimate)

__version__ = "0.1.0"
