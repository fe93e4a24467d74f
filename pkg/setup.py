"""Setup script for proxpareto."""
import re

import setuptools

with open("proxpareto/__init__.py", "r") as init_file:
    __version__ = re.search(r'^__version__ = "([^"]+)"', init_file.read(), re.M).group(1)

with open("README.md", "r") as readme_file:
    long_description = readme_file.read()

setuptools.setup(
    name="proxpareto-py",
    version=__version__,
    description="Subdifferentials, directional Lipschitz certification and proximal Pareto solvers "
    "for regularized multiobjective problems",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(exclude=["tests", "tests.*"]),
    package_data={"proxpareto": ["corpus/*.json"]},
    install_requires=["numpy>=1.20", "scipy>=1.6"],
    extras_require={"tests": ["pytest>=6"]},
    entry_points={"console_scripts": ["proxpareto=proxpareto.cli:main"]},
    classifiers=[
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Development Status :: 4 - Beta",
        "Natural Language :: English",
        "Intended Audience :: Science/Research",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering :: Mathematics",
        "License :: OSI Approved :: MIT License",
        "Typing :: Typed",
    ],
    python_requires=">=3.8",
)
