"""Learning ground-state properties of local Hamiltonians with geometric feature maps."""

__version__ = "0.1.0"
