"""
Installation configuration.
"""
import os
import json
import setuptools

# Fetch the root folder to specify absolute paths to the "include" files
ROOT = os.path.normpath(os.path.dirname(__file__))

# Specify which files should be added to the installation
PACKAGE_DATA = [
    os.path.join(ROOT, "cembed", "res", "metadata.json"),
    os.path.join(ROOT, "cembed", "res", "log-config.json"),
    os.path.join(ROOT, "cembed", "log", ".keep")
]

with open(os.path.join(ROOT, "cembed", "res", "metadata.json")) as f:
    metadata = json.load(f)

setuptools.setup(
    name=metadata["__title__"],
    description=metadata["__description__"],
    version=metadata["__version__"],
    author=metadata["__lead__"],
    author_email=metadata["__email__"],
    maintainer=metadata["__lead__"],
    maintainer_email=metadata["__email__"],
    packages=setuptools.find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    package_data={"cembed": PACKAGE_DATA},
    include_package_data=True,
    classifiers=[
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.8",
    ],
    install_requires=[
        "python-dotenv",
        "numpy",
        "scipy",
        "scikit-learn",
        "pandas",
    ],
    extras_require={
        "test": ["pytest"],
    },
    entry_points={
        "console_scripts": ["cembed=cembed.cli:main"],
    },
    python_requires=">=3.8",
)
