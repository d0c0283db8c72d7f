from setuptools import setup, find_packages

with open('requirements.txt') as f:
    requirements = [line for line in f.read().splitlines() if line and not line.startswith('pytest')]

setup(
    name='fedvote',
    version='0.1.0',
    packages=find_packages(exclude=['Tests', 'Tests.*', 'examples', 'examples.*']),
    install_requires=requirements,
    extras_require={'test': ['pytest>=7.0']},
    entry_points={
        'console_scripts': [
            'fedvote = Main.run:run',
        ],
    },

    description='Ensemble-based federated learning simulator with majority voting and federated averaging',
    long_description=open('README.md').read(),
    long_description_content_type='text/markdown',
    license='MIT',
    classifiers=[
        'Programming Language :: Python :: 3',
        'Operating System :: OS Independent',
    ]
)
