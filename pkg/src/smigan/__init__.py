"""Class-conditional SMILES sequence generation with adversarial and
frozen-classifier rewards."""

__version__ = "0.1.0"
