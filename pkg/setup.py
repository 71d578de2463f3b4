from setuptools import setup, find_packages

setup(
    name="phonon_laser_toolkit",
    packages=find_packages(include=["src", "src.*"]),
)
