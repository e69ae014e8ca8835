# -*- coding: utf-8 -*-
#
# tcsynth documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.

import sys
import os
import sphinx_bootstrap_theme

sys.path.insert(0, os.path.abspath('..'))
import tcsynth

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.doctest',
    'sphinx.ext.todo',
    'sphinx.ext.coverage',
    'sphinx.ext.napoleon'
]

napoleon_numpy_docstring = True

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = u'tcsynth'
copyright = u'2026, tcsynth developers'
author = u'tcsynth developers'

# The short X.Y version.
version = '.'.join(tcsynth.__version__.split('.')[0:2])
# The full version, including alpha/beta/rc tags.
release = tcsynth.__version__

language = None
exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']
pygments_style = 'sphinx'
todo_include_todos = True
autoclass_content = 'both'

# -- Options for HTML output ----------------------------------------------

html_theme = 'bootstrap'
html_theme_path = sphinx_bootstrap_theme.get_html_theme_path()
html_static_path = ['_static']
htmlhelp_basename = 'tcsynthdoc'

# -- Options for LaTeX output ---------------------------------------------

latex_elements = {}
latex_documents = [
    (master_doc, 'tcsynth.tex', u'tcsynth Documentation',
     author, 'manual'),
]

# -- Options for manual page output ---------------------------------------

man_pages = [
    (master_doc, 'tcsynth', u'tcsynth Documentation',
     [author], 1)
]

texinfo_documents = [
    (master_doc, 'tcsynth', u'tcsynth Documentation',
     author, 'tcsynth', 'Typeclass instance synthesis and linting.',
     'Miscellaneous'),
]
