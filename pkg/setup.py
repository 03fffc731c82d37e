"""
contclust
Continuous clustering and facility location by round-or-cut over ball-variable LP relaxations
"""
import os
import re
import sys
from setuptools import setup, find_packages

short_description = __doc__.split("\n")

# from https://github.com/pytest-dev/pytest-runner#conditional-requirement
needs_pytest = {'pytest', 'test', 'ptr'}.intersection(sys.argv)
pytest_runner = ['pytest-runner'] if needs_pytest else []

try:
    with open("README.md", "r") as handle:
        long_description = handle.read()
except:
    long_description = "\n".join(short_description[2:])


def _version():
    with open(os.path.join('contclust', '__init__.py')) as handle:
        return re.search(r"^__version__ = '([^']+)'", handle.read(), re.M).group(1)


setup(
    # Self-descriptive entries which should always be present
    name='contclust',
    description=short_description[0],
    long_description=long_description,
    long_description_content_type="text/markdown",
    version=_version(),
    license='MIT',
    python_requires='>=3.8',

    # Which Python importable modules should be included when your package is installed
    packages=find_packages(),

    # test instances and graphs used by the test suite
    include_package_data=True,
    package_data={'contclust': ['data/test_data/*']},

    # Allows `setup.py test` to work correctly with pytest
    setup_requires=[] + pytest_runner,
    scripts=['scripts/contclust'],

    install_requires=['numpy>=1.20',
                      'scipy>=1.6',      # linprog(method='highs')
                      'networkx>=2.5'],

    zip_safe=False,

)
