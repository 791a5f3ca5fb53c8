import re

from setuptools import find_packages, setup

with open("spectral_dependence/__init__.py", "r") as f:
    version = re.search(
        r'^__version__\s*=\s*[\'"]([^\'"]*)[\'"]', f.read(), re.MULTILINE
    ).group(  # type:ignore
        1
    )
with open("README.md", "r", encoding="utf-8") as f:
    long_description = f.read()

setup(
    name="spectral-dependence",
    python_requires=">=3.7",
    version=version,
    description="Lagged and instantaneous linear and nonlinear dependence between multivariate time series, "
                "from segmented cross-spectra.",
    long_description=long_description,
    long_description_content_type="text/markdown",
    license="MIT",
    packages=find_packages(exclude=["tests", "tests.*"]),
    platforms=["all"],
    classifiers=[
        "Development Status :: 4 - Beta",
        "Operating System :: OS Independent",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3.7",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Topic :: Scientific/Engineering",
    ],
    install_requires=["numpy>=1.17", "scipy>=1.4", "pydantic>=1.8,<2.0.0", "click>=8.0"],
    extras_require={"test": ["pytest"]},
    entry_points={"console_scripts": ["spectral-dependence=spectral_dependence.cli:main"]},
)
