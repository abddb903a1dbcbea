# -*- coding: utf-8 -*-
#
# Sphinx configuration for the django-flockspc documentation.

project = 'django-flockspc'
copyright = '2026, The django-flockspc developers'
version = '0.2.0'
release = version

master_doc = 'index'
source_suffix = '.rst'
extensions = []
templates_path = ['_templates']
exclude_patterns = ['_build']
html_theme = 'default'
