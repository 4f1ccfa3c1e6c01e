# Makes 'Fssqm' a package so 'from Fssqm.models import ...' works.
