# -*- coding: utf-8 -*-
#
# Sphinx configuration for the contclust documentation.

# Incase the project was not installed
import os
import sys
sys.path.insert(0, os.path.abspath('..'))

import contclust


# -- Project information -----------------------------------------------------

project = 'contclust'
copyright = ('2026, contclust developers')
author = 'contclust developers'

version = contclust.__version__
release = contclust.__version__


# -- General configuration ---------------------------------------------------

extensions = [
    'sphinx.ext.autosummary',
    'sphinx.ext.autodoc',
    'sphinx.ext.mathjax',
    'sphinx.ext.viewcode',
    'sphinx.ext.napoleon',
]

autosummary_generate = True

# numpy-style docstrings throughout the package
napoleon_google_docstring = False
napoleon_numpy_docstring = True
napoleon_use_param = False
napoleon_use_ivar = True

source_suffix = '.rst'
master_doc = 'index'
exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']
pygments_style = 'default'


# -- Options for HTML output -------------------------------------------------

html_theme = 'sphinx_rtd_theme'
htmlhelp_basename = 'contclustdoc'


# -- Options for other output formats ----------------------------------------

latex_documents = [
    (master_doc, 'contclust.tex', 'contclust Documentation', author, 'manual'),
]

man_pages = [
    (master_doc, 'contclust', 'contclust Documentation', [author], 1)
]
