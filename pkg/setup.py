from setuptools import setup

setup(name='repday',
      version='0.1.0',
      description='Representative-day time series aggregation for power system expansion planning',
      long_description=open('README.rst', encoding="utf8").read(),
      license='GPLv3',
      packages=['repday', 'repday.datasets'],
      package_data={'repday': ['logging.ini']},
      classifiers = [
          'Development Status :: 3 - Alpha',
          'Intended Audience :: Science/Research',
          'Programming Language :: Python',
          'Programming Language :: Python :: 3.6',
          'Programming Language :: Python :: 3.7',
      ],
      keywords='power-systems expansion-planning time-series-aggregation clustering linear-programming',
      install_requires=[
           'numpy>=1.14.5,<2',
           'scipy>=1.6.0,<2',
           'pandas>=0.25,<2',
      ],
      entry_points={
          'console_scripts': ['repday = repday.cli:main'],
      },
      include_package_data = True,
)
