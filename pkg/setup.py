'''
https://github.com/pypa/sampleproject/blob/master/setup.py
'''

from setuptools import setup, find_packages
# To use a consistent encoding
from codecs import open
from os import path

here = path.abspath(path.dirname(__file__))

with open(path.join(here, 'README.rst'), encoding='utf-8') as f:
    long_description = f.read()

with open(path.join(here, 'tcsynth', '__init__.py'), encoding='utf-8') as f:
    version = [line.split("'")[1] for line in f
               if line.startswith('__version__')][0]


setup(
    name='tcsynth',
    version=version,
    description='Typeclass instance synthesis, linting and term-size '
    'benchmarks for a small declaration language',
    long_description=long_description,
    url='',
    license='',
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Developers',
        'Intended Audience :: Science/Research',
        'Topic :: Software Development :: Compilers',
        'Programming Language :: Python :: 3',
    ],
    packages=find_packages(exclude=['contrib', 'doc', 'test']),
    package_data={
        'tcsynth.bins': ['corpus/*.tc', 'corpus/manifest.yml']
    },
    scripts=['runTCS'],
    python_requires='>=3.7',
    install_requires=[
        'numpy',
        'matplotlib',
        'autologging',
        'ruamel.yaml',
        'pandas',
        'tabulate',
        'pathos',
        'termcolor',
    ],
    extras_require={
        'test': ['pytest', 'hypothesis'],
    })
