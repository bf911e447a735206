"""setuptools manifest for investigative-search-tools."""

from os import path

from setuptools import setup, find_packages

here = path.abspath(path.dirname(__file__))

with open(path.join(here, 'README.md'), encoding='utf-8') as f:
    long_description = f.read()

requirements = [
    'numpy',
    'pandas>=1.5',
    'joblib',
    'tqdm',
    'networkx',
    'typer',
    'click',
]
test_requirements = ['pytest']

setup(
    name='investigative-search-tools',
    version='0.1',
    description="Investigative graph pattern matching: ranked partial matches of a query pattern in a labeled graph",
    long_description=long_description,
    long_description_content_type='text/markdown',
    packages=find_packages(exclude=['tests']),
    package_data={'InvestigativeSearchTools': ['data/*/*.json', 'data/*/*.tsv']},
    include_package_data=True,
    install_requires=requirements,
    extras_require={'test': test_requirements},
    python_requires='>=3.8',
    entry_points={'console_scripts': ['invsim=InvestigativeSearchTools.cli:main']},
    zip_safe=False,
    keywords='graph simulation pattern-matching investigative-search',
)
