import setuptools

with open("README.md", "r") as fh:
    long_description = fh.read()

setuptools.setup(
    name="shifted-dp",
    version="0.0.1",
    author="shifted-dp Authors",
    description="Shifted Bellman operators for average cost optimal control",
    long_description=long_description,
    long_description_content_type="text/markdown",
    python_requires=">=3.7",
    packages=setuptools.find_packages(exclude=["tests", "examples*"]),
    include_package_data=True,
    install_requires=[
        "numpy",
        "scipy",
        "simplejson",
        "parameterized",
        "progressbar2",
    ],
    entry_points={
        "console_scripts": ["solver=shifted_dp.cli:main"],
    },
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: ISC License",
        "Operating System :: OS Independent",
    ],
)
