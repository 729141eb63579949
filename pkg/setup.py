from setuptools import find_packages, setup

setup(
    name="flowmon",
    version="0.1.0",
    description="NetFlow v5 collector and hourly per-site transfer-rate monitor.",
    author="flowmon maintainers",
    packages=find_packages(include=["flowmon", "flowmon.*"]),
    package_data={"flowmon.logger": ["config_logger.yaml"]},
    python_requires=">=3.11",
    install_requires=[
        "numpy>=1.26",
        "pyyaml>=6.0",
    ],
    entry_points={"console_scripts": ["flowmon=flowmon.toolkit.cli:main"]},
)
