from setuptools import setup, find_packages


setup(
    name="pyqse",
    version="0.1.0",
    packages=find_packages(exclude=['tests']),
    python_requires='>=3.8',
    install_requires=[
        'numpy>=1.21',
        'scipy>=1.7',
        'pytz==2021.1',
        'tzlocal==2.1',
        'pytest>=6.2.4',
        'hypothesis>=6.14',
    ],
    entry_points={
        'console_scripts': ['pyqse=pyqse.cli:main'],
    },
)
