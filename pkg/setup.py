from setuptools import setup

setup(name='gst-connectivity',
      version='0.1dev',
      description='Connectivity checks for symmetric game states with '
                  'independence and influence',
      packages=['gstn'],
      package_data={'gstn': ['data/*.yml']},
      scripts=['bin/gstcheck'],
      )
