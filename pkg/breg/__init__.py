"""breg - scaled Bregman distances and phi-divergences"""

__version__ = "0.1.0"
