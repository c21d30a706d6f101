# constants package
