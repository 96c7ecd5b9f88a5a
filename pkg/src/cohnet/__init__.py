"""Distributed coherent group communications: gains, beamforming, formation, link budget."""

from .beamforming import (BeamPolicy, ComplexityError, optimize_single_phase, run_bt, run_es, run_io,
                          run_policy, run_rb, run_rt, run_sf)
from .formation import (JOINT_PROTOCOLS, FormationPolicy, JointProtocol, distance_formation,
                        exhaustive_formation, random_formation, run_joint)
from .gain import (GainReport, SignalParams, SirReport, StreamAssignment, beta, coherent_gain, objective,
                   period_energy_numeric, rho, sir_gain, sir_report, triangle_bound, upper_bound)
from .linkbudget import (DopplerReport, LinkBudgetParams, OverheadParams, doppler_tolerance, rate_comparison,
                         training_overhead)
from .scenario import (ChannelMatrix, ChannelModel, NodeLayout, ScenarioConfig, build_channels, channel_gain,
                       make_scenario, phase_shift, place_nodes)

__version__ = "0.1.0"
