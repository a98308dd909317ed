"""Factorial and screening designs for experimental reproducibility checks."""

def init():
    from . import design, effects, errors, files, plots, random, screening, \
                  simulate
    import sys

    this = sys.modules[__name__]
    names = []
    for module in (errors, random, design, effects, screening, simulate,
                   plots, files):
        for name in module.__all__:
            setattr(this, name, getattr(module, name))
        names += module.__all__
    setattr(this, "__all__", sorted(set(names + ["datasets"])))

init()
del init

from . import datasets

VERSION = "1.0.0"
