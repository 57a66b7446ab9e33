from setuptools import setup
import re

PACKAGE_NAME = 'fcontact'


def get_version():
    try:
        f = open(f"{PACKAGE_NAME}/_version.py")
    except EnvironmentError:
        return None
    for line in f.readlines():
        mo = re.match("__version__ = '([^']+)'", line)
        if mo:
            ver = mo.group(1)
            return ver
    return None


setup(
    name='python-fcontact',
    version=get_version(),
    packages=[PACKAGE_NAME],
    scripts=[],
    license='LICENSE.txt',
    description='Verification and deformation of metric f-contact structures on coordinate charts',
    long_description='',
    python_requires='>=3.9',
    install_requires=[
        'numpy>=1.20',
        'click>=7.0',
        'pydantic>=2.0',
    ],
    extras_require={
        "test": ['pytest>=6.0', 'hypothesis>=6.0', 'scipy>=1.6'],
    },
    entry_points={
        'console_scripts': ['fcontact=fcontact.cli:cli'],
    },
)
