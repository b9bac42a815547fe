# -*- coding: utf-8 -*-
#
# platform-qbd documentation build configuration file.

import sys, os

# qbdLib lives under Lib/ in the source tree
sys.path.insert(0, os.path.abspath(os.path.join('..', 'Lib')))

# -- General configuration -----------------------------------------------------

extensions = ['sphinx.ext.autodoc', 'sphinx.ext.doctest', 'sphinx.ext.todo', 'sphinx.ext.coverage', 'sphinx.ext.viewcode', 'sphinx.ext.mathjax']

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = u'platform-qbd'
copyright = u'2026, the platform-qbd contributors'

# The short X.Y version.
version = '1.0'
# The full version, including alpha/beta/rc tags.
release = '1.0.0.dev0'

exclude_patterns = ['_build']
pygments_style = 'sphinx'

autodoc_member_order = 'bysource'

# -- Options for HTML output ---------------------------------------------------

html_theme = 'default'
html_static_path = ['_static']
htmlhelp_basename = 'platform-qbd-doc'

# -- Options for LaTeX output --------------------------------------------------

latex_documents = [
  ('index', 'platform-qbd.tex', u'platform-qbd Documentation',
   u'the platform-qbd contributors', 'manual'),
]

# -- Options for manual page output --------------------------------------------

man_pages = [
    ('index', 'platform-qbd', u'platform-qbd Documentation',
     [u'the platform-qbd contributors'], 1)
]
