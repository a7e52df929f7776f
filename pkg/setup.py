from setuptools import setup, find_packages


def read_requirements():
    """Read requirements.txt and return a list of dependencies."""
    with open("requirements.txt", "r") as fh:
        return [ line for line in fh.read().splitlines() if line.strip() != '' ]


with open("README.md", "r") as fh:
    long_description = fh.read()


setup(
    name="cellfreetools",
    version="0.9.0",
    author="cellfreetools developers",
    description="Weighted sum-rate hybrid and fully digital precoding for cell-free mmWave MIMO, with a seeded Monte-Carlo experiment runner.",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
    ],
    python_requires='>=3.9',
    install_requires=read_requirements(),
    entry_points={ "console_scripts": [ "cellfree=cellfreetools.wireless.cli:run" ] },
)
