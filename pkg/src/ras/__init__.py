"""ras: rational-agent simulator.

Synchronous message-passing simulator for distributed protocols among
rational agents, with Sybil-duplication adversaries and exact (rational
arithmetic) equilibrium analysis over priors on the network size.
"""

__version__ = "0.1.0"
