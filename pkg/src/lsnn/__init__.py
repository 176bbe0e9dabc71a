"""Recurrent spiking networks with adaptive thresholds: simulation,
surrogate-gradient BPTT, sparse rewiring, and task harnesses."""

from .backprop import GradientError, Gradients, backward, pseudo_derivative
from .builders import build_network
from .checkpoint import Checkpoint, CheckpointError, load_checkpoint, save_checkpoint
from .config import ConfigError, default_config, load_config, validate_config
from .encoders import (ThresholdCodeSpec, TuningCurveSpec, encode_gaussian_tuning,
                       encode_population_rate, encode_reward_pulse,
                       encode_threshold_crossing, encode_threshold_sequence,
                       l2l_tuning_spec, rl_tuning_spec)
from .initialization import init_dale, init_gaussian, sample_signs, sparse_mask
from .losses import (firing_rate_regularizer, firing_rates_hz,
                     loss_crossentropy_avg, loss_mse, softmax)
from .network import (ConfigurationError, NetworkParams, NetworkState, NeuronParams,
                      SimTape, SimulationDivergedError, simulate)
from .optimizers import AdamState, LrSchedule, adam_step, lr_at
from .rewiring import RewireConfig, RewireInvariantError, active_count, deepr_step
from .rl import (ArenaConfig, PPOConfig, clipped_surrogate, decode_action,
                 discounted_returns, env_reset, env_step, gaussian_logp_entropy,
                 ppo_loss, train_meta_rl)
from .supervised import (SinusTask, TargetNetwork, build_l2l_episode,
                         ff_backprop_baseline, linear_baseline, run_seq_pixel_task,
                         train_delayed_cue, train_l2l_outer)

__version__ = "0.1.0"
