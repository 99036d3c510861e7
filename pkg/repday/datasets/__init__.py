""" Synthetic systems and time series for studies and tests. """
