"""Single-photon interferometer simulator and analysis toolkit for
equality fingerprinting protocols."""

from . import backend
from .classical import (BoundReport, QuantumCost, SmpSearchResult, Strategy,
                        breakeven_n, brute_force_smp, full_bound_report,
                        holevo_classical_cap, quantum_cost,
                        quantum_cost_rate_half, shared_randomness_floor,
                        smp_equality_lower_bounds, strategy_space_size)
from .ecc import (Code, CodeKind, as_bits, bits_to_hex, bits_to_string,
                  encode, hadamard_code, hamming_distance, identity_code,
                  justesen_nu, load_code, min_distance_bruteforce,
                  random_linear_code, repetition_code, save_code)
from .errors import (CodeFormatError, ConfigError, DimensionError,
                     DomainError, NormalizationError, QfpError,
                     ResourceLimitError, StageMismatchError)
from .modes import (ModeLabel, ModeState, PortProbabilities, Stage,
                    apply_phases, dump_amplitudes_csv, inverse_recombine,
                    load_amplitudes_csv, port_probabilities, prepare_split,
                    recombine)
from .physical import (FeasibleD, ImperfectionModel, NoiseRates, PhotonSplit,
                       conditional_error_with_noise, feasible_d,
                       photon_number_distribution)
from .protocol import (BatchResult, ProtocolParams, RunResult, Verdict,
                       amplified_error_bound, batch_report_rows,
                       build_branch_state, exact_report_row,
                       phase_protocol_average_error, phase_protocol_pn,
                       phase_protocol_pn_closed_form, repetitions_needed,
                       run_batch, run_exact, run_sampled)

__version__ = "0.1.0"
