#!/usr/bin/env python3
"""
Fallback setup.py for the qmetric package.
Modern installations should use pyproject.toml, but this provides compatibility.
"""

import os

from setuptools import find_packages, setup


def read_readme():
    """Read README.md file."""
    readme_path = os.path.join(os.path.dirname(__file__), "README.md")
    if os.path.exists(readme_path):
        with open(readme_path, "r", encoding="utf-8") as f:
            return f.read()
    return "Quantum metrics on finite-dimensional C*-algebras"


setup(
    name="qmetric",
    version="1.0.0",
    description="Quantum metrics on finite-dimensional C*-algebras",
    long_description=read_readme(),
    long_description_content_type="text/markdown",
    packages=find_packages(include=["qmetric", "qmetric.*"]),
    install_requires=[
        "numpy>=1.24.0",
        "scipy>=1.12.0",
        "pydantic>=2.0.0",
        "python-dotenv>=1.0.0",
    ],
    extras_require={
        "dev": [
            "pytest>=7.0.0",
            "pytest-cov>=4.0.0",
            "hypothesis>=6.80.0",
        ],
    },
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires=">=3.9",
    entry_points={
        "console_scripts": [
            "qmetric=qmetric.cli:main",
        ],
    },
    keywords="quantum-metric c-star-algebra noncommutative-geometry lipschitz cli",
    include_package_data=True,
    zip_safe=False,
)
