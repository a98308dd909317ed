import doekit
import numpy
import pytest


DOCTEST_INITIALISED = False

def initialise_doctest():
    """Initialise the doctest environement."""

    global DOCTEST_INITIALISED

    with open("model.toml", "w") as f:
        f.write("""\
intercept = 100.0
sd = 3.0
seed = 3001

[main]
X = 10.0
A = 3.0
B = 2.0

[[interactions]]
a = "X"
b = "B"
coef = 3.0
""")

    DOCTEST_INITIALISED = True


@pytest.fixture(autouse=True)
def _docdir(request, doctest_namespace):

    doctest_plugin = request.config.pluginmanager.getplugin("doctest")
    if isinstance(request.node, doctest_plugin.DoctestItem):
        doctest_namespace["doekit"] = doekit
        doctest_namespace["numpy"] = numpy
        tmpdir = request.getfixturevalue("tmpdir")
        with tmpdir.as_cwd():
            initialise_doctest()
            yield
    else:
        yield
