import setuptools

with open("README.md", "r") as fh:
    long_description = fh.read()

setuptools.setup(
    name="biobb_nehari",
    version="1.0.0",
    author="Biobb developers",
    author_email="pau.andrio@bsc.es",
    description="biobb_nehari is the Biobb module collection to compute nonlinear generalized Rayleigh quotients and Nehari manifold solutions.",
    long_description=long_description,
    long_description_content_type="text/markdown",
    keywords="Variational methods Nehari manifold Rayleigh quotient BioExcel Compatibility",
    url="https://github.com/bioexcel/biobb_nehari",
    project_urls={
        "Documentation": "http://biobb-nehari.readthedocs.io/en/latest/",
        "Bioexcel": "https://bioexcel.eu/",
    },
    packages=setuptools.find_packages(exclude=["docs", "test"]),
    package_data={"biobb_nehari": ["py.typed"]},
    install_requires=["biobb_common==5.0.0", "numpy>=1.22", "scipy>=1.8"],
    python_requires=">=3.9",
    entry_points={
        "console_scripts": [
            "fiber = biobb_nehari.nehari.fiber:main",
            "quotient = biobb_nehari.nehari.quotient:main",
            "extremal = biobb_nehari.nehari.extremal:main",
            "ground_state = biobb_nehari.nehari.ground_state:main",
            "branch = biobb_nehari.nehari.branch:main",
            "zero_mass = biobb_nehari.nehari.zero_mass:main",
            "nehari_check = biobb_nehari.nehari.nehari_check:main",
            "nehari_rq = biobb_nehari.nehari.nehari_rq:main",
        ]
    },
    classifiers=[
        "Development Status :: 4 - Beta",
        "Programming Language :: Python :: 3.9",
        "License :: OSI Approved :: Apache Software License",
        "Operating System :: MacOS :: MacOS X",
        "Operating System :: POSIX",
        "Operating System :: Unix",
    ],
)
