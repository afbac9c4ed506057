"""Global-local neuron laboratory.

Dense networks with a trainable sine/tanh mixing activation, baseline
models, Adam training with early stopping, residual-loss solvers for seven
differential equations, and the descriptive/KS statistics used to compare
models across seeded repetitions.
"""

__version__ = "0.1.0"
