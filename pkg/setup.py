import os
from setuptools import setup, find_packages


def read(fname):
    return open(os.path.join(os.path.dirname(__file__), fname)).read()

setup(
    name="cokb",
    version="0.1",
    description=("Knowledge-base grounded answering for black-box LLMs: "
                 "self-consistency gating, structured KB queries and "
                 "contrastive query-generator data."),
    license="MIT",
    keywords="llm knowledge-base sparql wikidata question-answering",
    packages=find_packages(exclude=['cokb.tests']),
    package_dir={'cokb': 'cokb'},
    package_data={'cokb': ['llm/templates/*.txt', 'data/*.json']},
    long_description=read('README.rst'),
    classifiers=[
        "Development Status :: 3 - Alpha",
        "License :: OSI Approved :: MIT License",
        "Intended Audience :: Science/Research",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: Implementation :: CPython",
        "Topic :: Scientific/Engineering :: Artificial Intelligence",
    ],
    python_requires='>=3.11',
    test_suite='cokb.tests',
    install_requires=[
        'requests>=2.28,<3.0',
        'click>=8.1,<9.0',
        'tqdm>=4.64,<5.0',
        'ply>=3.11,<4.0',
    ],
    entry_points={
        'console_scripts': ['cokb = cokb.cli:entry_point'],
    },
)
