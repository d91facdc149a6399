from setuptools import setup, find_packages

setup(
    name="hybrid-marl-workbench",
    version="0.1.0",
    packages=find_packages(exclude=["tests", "tests.*"]),
    python_requires=">=3.10",
    install_requires=[
        "numpy",
        "pandas",
        "matplotlib",
        "pydantic>=2",
        "python-dotenv",
        "tenacity",
        "typer",
    ],
    extras_require={
        "dev": [
            "pytest",
            "pytest-cov",
            "pytest-timeout",
            "hypothesis",
        ],
    },
    entry_points={
        "console_scripts": ["hmarl=src.main:main"],
    },
)
