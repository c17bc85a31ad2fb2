# Sphinx configuration of the medsync documentation.
import os
import sys

rundir = os.path.dirname(__file__)
sys.path.insert(0, os.path.sep.join(rundir.split(os.path.sep)[0:-2]))

import medsync  # noqa: E402

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.autosummary',
    'sphinx.ext.mathjax',
    'sphinx.ext.viewcode',
]

# heavy or optional imports are not needed to render the API pages
autodoc_mock_imports = [
    'joblib',
    'tqdm',
    'cloudpickle'
]

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = u'medsync'
copyright = u'2026, medsync developers'
version = medsync.__version__
release = medsync.__version__

exclude_patterns = ['_build']
pygments_style = 'sphinx'

html_theme = 'default'
if os.environ.get('READTHEDOCS', None) != 'True':
    try:
        import sphinx_rtd_theme
        html_theme = 'sphinx_rtd_theme'
        html_theme_path = [sphinx_rtd_theme.get_html_theme_path()]
    except ImportError:
        pass

html_show_sourcelink = False
htmlhelp_basename = 'medsyncdoc'
