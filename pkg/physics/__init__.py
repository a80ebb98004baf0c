# physics/__init__.py - Initialize the physics package

# Expose the model types that scenario configs are built from
from physics.ldos import (HomogeneousProfile, LorentzianCavity, WaveguideBandEdge, TabulatedProfile,
                          CavityParams, WaveguideModeParams)
from physics.spectrum import Spectrum, normalize
from physics.emitter_dynamics import EmitterConfig
from physics.quantum_dot import ExcitonRates, DecayCurve
from physics.resonance_fluorescence import DriveParams
from physics.cavity_jc import JcParams, JcState
from physics.phonons import PhononParams
from physics.waveguide import ScatterParams, DipolePair, EfficiencyBudget
